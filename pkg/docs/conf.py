# -*- coding: utf-8 -*-
#
# pathfinder documentation build configuration file.

from importlib.metadata import version as distribution_version

extensions = []

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'pathfinder'
copyright = u'2026, the pathfinder developers'

release = distribution_version('pathfinder-nlos')
version = '.'.join(release.split('.')[:2])

exclude_patterns = ['_build']

pygments_style = 'sphinx'

html_theme = 'default'

html_static_path = ['_static']

htmlhelp_basename = 'pathfinderdoc'

latex_elements = {
}

latex_documents = [
    ('index', 'pathfinder.tex', u'pathfinder Documentation',
     u'pathfinder developers', 'manual'),
]

man_pages = [
    ('index', 'pathfinder', u'pathfinder Documentation',
     [u'pathfinder developers'], 1),
    ('profiling', 'Profiling', u'Profiling',
     [u'pathfinder developers'], 2),
]

texinfo_documents = [
    ('index', 'pathfinder', u'pathfinder Documentation',
     u'pathfinder developers', 'pathfinder', 'Passive non-line-of-sight tracking.',
     'Miscellaneous'),
]
