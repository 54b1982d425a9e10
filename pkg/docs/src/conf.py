# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Path setup --------------------------------------------------------------

from datetime import datetime

import sys
import pathlib

here = pathlib.Path(__file__).parent
sys.path.insert(0, str(here.parent.parent))

from cubeabs import version  # noqa: E402

# -- Project information -----------------------------------------------------

project = "cubeabs"
version = version
author = "cubeabs developers"
years = "-".join(sorted({"2025", f"{datetime.now():%Y}"}))
copyright = f"{years}, {author}"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.todo",
    "sphinx_autodoc_typehints",
    "sphinx_rtd_theme",
]

templates_path = ["_templates"]

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# -- Autodoc configuration ---------------------------------------------------

autodoc_mock_imports = []
autodoc_member_order = "bysource"

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_options = {
    "navigation_depth": 2,
    "collapse_navigation": True,
}
