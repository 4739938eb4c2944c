from setuptools import setup, find_packages

setup(
    name='numtaprep',
    version='0.1.0',
    description='Handwritten digit image preprocessing pipeline and classifier bench',
    packages=find_packages(),
    install_requires=(
        'numpy>=1.17.0',
        'pandas>=0.25.0',
        'pyyaml>=5.1',
        'scipy>=1.4.0',
        'tqdm>=4.25.0',
    ),
    extras_require={
        'plot': ('matplotlib>=3.0.2', 'seaborn>=0.11.0'),
        'test': ('pytest>=5.0', 'sympy>=1.6'),
    },
    entry_points={
        'console_scripts': ['numtaprep=numtaprep.cli:main'],
    },
)
