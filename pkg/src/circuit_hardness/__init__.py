"""Namespace package for Python code related to circuit hardness experiments."""
__path__ = __import__('pkgutil').extend_path(__path__, __name__)
