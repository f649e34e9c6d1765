from setuptools import setup, find_packages
from shlrkit import version

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="shlrkit",
    version=version.__version__,
    description="Chevalley-Eilenberg complexes of SHLR pairs, with exact cofibration and weak-equivalence checks.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    platforms="any",
    packages=find_packages(exclude=["tests"]),
    package_data={"shlrkit": ["models/*.shlr"]},
    python_requires=">=3.8",
    install_requires=["sympy", "ply", "tqdm"],
    extras_require={"test": ["pytest"]},
    entry_points={
        "console_scripts": [
            "shlrkit=shlrkit.main:cli",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Intended Audience :: Science/Research",
        "Intended Audience :: Developers",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Operating System :: OS Independent",
        "Natural Language :: English",
    ],
)
