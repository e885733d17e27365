from setuptools import setup, find_packages

setup(
    name="aafv",
    version="1.0.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "scipy",
        "pandas>=2.0",
        "pydantic>=2.0",
        "pydantic-settings",
        "python-dotenv",
        "PyYAML",
    ],
    entry_points={
        "console_scripts": [
            "aafv=aafv.main:main",
        ],
    },
)
