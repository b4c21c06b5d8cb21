# -*- coding: utf-8 -*-
"""
Poetry builds the distribution; this shim only serves `pip install -e .`
in a checkout. It does not declare dependencies, install them first:
pip install numpy scipy python-simpleconf[toml]
"""
from setuptools import setup

setup(name="wshift", packages=["wshift"])
