#!/usr/bin/env python3
"""
Setup script for qequil - equilibria of strategic games under quantum strategies

This setup.py provides backward compatibility for pip installations
that don't fully support pyproject.toml. The primary configuration
is in pyproject.toml.
"""

from setuptools import find_packages, setup

if __name__ == "__main__":
    setup(
        name="qequil",
        version="0.1.0",
        description="Command-line toolkit for correlated equilibria of strategic games under quantum strategies",
        long_description=open("README.md").read(),
        long_description_content_type="text/markdown",
        author="qequil developers",
        packages=find_packages(include=["qequil", "qequil.*"]),
        package_data={"qequil": ["config/default_config.md"]},
        install_requires=[
            "click>=8.0.0",
            "pydantic>=2.0.0",
            "numpy>=1.24.0",
            "scipy>=1.11.0",
            "cvxpy>=1.4.0",
            "clarabel>=0.6.0",
            "pyyaml>=6.0.0",
            "rich>=13.0.0",
        ],
        extras_require={
            "dev": [
                "pytest>=7.0.0",
                "pytest-mock>=3.10.0",
                "pytest-cov>=4.0.0",
                "black>=23.0.0",
                "mypy>=1.0.0",
                "ruff>=0.1.0",
                "pre-commit>=3.0.0",
            ],
            "test": [
                "pytest>=7.0.0",
                "pytest-mock>=3.10.0",
                "pytest-cov>=4.0.0",
            ],
        },
        entry_points={
            "console_scripts": [
                "qequil=qequil.cli.main:cli",
            ],
        },
        python_requires=">=3.10",
        classifiers=[
            "Development Status :: 3 - Alpha",
            "Intended Audience :: Science/Research",
            "License :: OSI Approved :: MIT License",
            "Operating System :: OS Independent",
            "Programming Language :: Python :: 3",
            "Topic :: Scientific/Engineering :: Mathematics",
        ],
        keywords=["game theory", "correlated equilibrium", "quantum", "semidefinite programming"],
        license="MIT",
        include_package_data=True,
        zip_safe=False,
    )
