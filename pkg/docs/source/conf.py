# Configuration file for the Sphinx documentation builder.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath("../.."))

source_suffix = [".rst", ".md"]

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "recommonmark",
]

project = "rate-regions"
release = "0.1"

templates_path = ["_templates"]
exclude_patterns = []

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = ["_static"]
