from setuptools import find_packages, setup

with open("README.md", "r") as f:
    long_description = f.read()

setup(
    name="mobilego",
    version="1.0.0",
    description="Residual and Mobile Networks for Computer Go",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="Apache 2.0",
    install_requires=[
        "matplotlib>=3.3.4",
        "numpy>=1.20.0",
        "pandas>=1.2.0",
        "Pillow>=8.1.2",
        "pre-commit>=2.17.0",
        "sgfmill>=1.1.1",
        "torch>=1.9.0",
        "tqdm>=4.49.0",
    ],
    extras_require={
        "tests": [
            "coverage",
            "pylint",
            "pytest",
            "pytest-pep8",
        ],
    },
    entry_points={
        "console_scripts": ["mobilego=mobilego.cli:main"],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Developers",
        "Intended Audience :: Education",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Games/Entertainment :: Board Games",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    packages=find_packages(exclude=["tests", "tests.*"]),
)
