from setuptools import setup, find_packages

with open("README.md", "r") as readme_file:
    readme = readme_file.read()

requirements = [
    "pydantic>=2.6.0",
    "numpy>=1.26.0",
    "scipy>=1.12.0",
    "sympy>=1.12",
    "click>=8.2.0",
]

setup(
    name="semiclassical_moments",
    version="0.1.0",
    description="Poisson algebra of quantum moments and semiclassical effective dynamics",
    long_description=readme,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    install_requires=requirements,
    extras_require={"test": ["pytest>=8.0.0", "hypothesis>=6.98.0"]},
    entry_points={"console_scripts": ["semiclassical=semiclassical_moments.cli:main"]},
    license="MIT",
    python_requires=">=3.9.13",
)
