#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# budgetid documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))


#  on_rtd is whether we are on readthedocs.org
on_rtd = os.environ.get('READTHEDOCS', None) == 'True'


# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'numpydoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.autosectionlabel',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

numpydoc_class_members_toctree = False

intersphinx_mapping = {
    'sklearn': ('https://scikit-learn.org/stable/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'python': ('https://docs.python.org/3', None),
}

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'budgetid'
copyright = '2026, budgetid developers'
author = 'budgetid developers'

# The short X.Y version and the full version, including alpha/beta/rc tags.
with open('../VERSION', 'r') as f:
    release = f.read().strip()
    version = release.rsplit('.', 1)[0]

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store', '**tests**']
pygments_style = 'sphinx'
todo_include_todos = False


# -- Options for HTML output ----------------------------------------------

html_theme = 'default'

if not on_rtd:  # only import and set the theme if we're building docs locally
    import sphinx_rtd_theme
    html_theme = 'sphinx_rtd_theme'
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

htmlhelp_basename = 'budgetiddoc'


# -- Options for LaTeX, manual page and Texinfo output --------------------

latex_elements = {}

latex_documents = [
    (master_doc, 'budgetid.tex', 'budgetid Documentation',
     author, 'manual'),
]

man_pages = [
    (master_doc, 'budgetid', 'budgetid Documentation',
     [author], 1)
]

texinfo_documents = [
    (master_doc, 'budgetid', 'budgetid Documentation',
     author, 'budgetid',
     'Difficulties, lower bounds and simulations for fixed-budget '
     'identification.',
     'Miscellaneous'),
]
