import re

from setuptools import setup

with open("netgames/__init__.py") as _f:
    version = re.search(r'^__version__ = "([^"]+)"', _f.read(), re.M).group(1)


def readme():
    """Import README for use as long_description."""
    with open("README.rst") as f:
        return f.read()


setup(
    name="netgames",
    version=version,
    description="Networked stochastic games and multi-agent actor-critic learners",
    long_description=readme(),
    long_description_content_type='text/x-rst',
    license="MIT",
    packages=["netgames", "netgames.lib"],
    package_data={"netgames": ["presets/*.yaml"]},
    zip_safe=False,
    python_requires='>=3.9',
    install_requires=[
        "boto3>=1.26",
        "PyYAML>=3",
        "numpy>=1.21.0,<2",
        "python-dotenv>=1.0",
    ],
    setup_requires=["flake8"],
    include_package_data=True,
    entry_points={
        "console_scripts": ["netgames=netgames.cli:main"],
    },
)
