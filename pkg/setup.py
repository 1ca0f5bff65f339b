from setuptools import setup, find_packages

setup(
    name="pa-random-join-lab",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "mcp[cli]>=1.5.0",
        "mpmath>=1.3.0",
        "numpy>=1.23.0",
        "tqdm>=4.64.0",
    ],
    extras_require={
        "test": [
            "hypothesis>=6.80.0",
            "pytest>=7.4.0",
        ],
    },
)
