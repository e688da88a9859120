# Sphinx configuration for the crossdiff documentation.
# The API pages are written by hand with ``py:function`` / ``py:class``
# directives, so no extension is loaded.

from importlib.metadata import version as _dist_version

project = "crossdiff"
author = "crossdiff developers"
copyright = "2024, crossdiff developers"  # noqa: A001

release = _dist_version("crossdiff")
version = ".".join(release.split(".")[:2])

extensions: list[str] = []
master_doc = "index"
source_suffix = ".rst"
language = "en"
exclude_patterns: list[str] = []
pygments_style = "sphinx"

html_theme = "alabaster"
html_theme_options = {"page_width": "auto"}
