# setup.py

from setuptools import setup, find_packages

setup(
    name="privscore",
    version="0.1.0",
    author="The privscore developers",
    description="Privilege scores and privilege score contributions for auditing classifiers",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(),
    package_data={
        "privscore": ["resources/*.json"],
    },
    install_requires=[
        'numpy>=1.25',
        'pandas>=2.0',
        'scipy>=1.11',
        'scikit-learn>=1.2',
        'statsmodels>=0.14',
        'networkx>=3.1',
        'joblib>=1.3',
        'matplotlib>=3.7',
    ],
    entry_points={
        "console_scripts": [
            "privscore=privscore.cli:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.9',
)
