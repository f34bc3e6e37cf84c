import os
from setuptools import find_packages, setup

# allow setup.py to be run from any path
os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

setup(
    name='pathfinder-nlos',
    use_scm_version=True,
    packages=find_packages(include=['pathfinder', 'pathfinder.*']),
    include_package_data=True,
    license='MIT License',
    description='Passive non-line-of-sight tracking from a moving camera, at desk scale',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Framework :: Django',
        'Framework :: Django :: 3.2',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Image Recognition',
    ],
    install_requires=[
        'Django>=3.2',
        'Jinja2',
        'numpy>=1.20',
        'scipy>=1.6',
    ],
    entry_points={
        'console_scripts': ['pathfinder=pathfinder.cli:main'],
    },
    python_requires='>=3.8',
    setup_requires=['setuptools_scm'],
)
