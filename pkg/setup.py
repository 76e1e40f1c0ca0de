from setuptools import setup, find_packages

# read the contents of README file
from os import path

this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="drrmdpf",
    packages=find_packages("src"),
    package_dir={"": "src"},
    version="0.1.0",
    license="MIT",
    description="Discrete-event simulator for DRR-MDPF forwarding in Named Data Networking",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=["ndn", "forwarding", "drr", "mdp", "simulation"],
    python_requires=">=3.8",
    install_requires=["numpy", "networkx", "pyyaml"],
    extras_require={
        "tests": [
            "pytest",
        ]
    },
    entry_points={
        "console_scripts": [
            "drrmdpf = drrmdpf.__main__:main",
        ]
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: System :: Networking",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
    ],
)
