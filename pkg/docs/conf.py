# Configuration file for the Sphinx documentation builder.
#
# Only the options this project changes from the Sphinx defaults are set; see
# http://www.sphinx-doc.org/en/master/config for the rest.

# -- Project information -----------------------------------------------------

project = "django-jm-uplink"
copyright = "2022, Wildfish"
author = "Wildfish"

version = "1.0"
release = "1.0.0"


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.mathjax",
    "sphinx_wildfish_theme",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_wildfish_theme"
html_static_path = ["_static"]
htmlhelp_basename = "django-jm-uplinkdoc"


# -- Other output formats ----------------------------------------------------

latex_documents = [
    (
        master_doc,
        "django-jm-uplink.tex",
        "django-jm-uplink Documentation",
        "Wildfish",
        "manual",
    )
]

man_pages = [
    (master_doc, "django-jm-uplink", "django-jm-uplink Documentation", [author], 1)
]
