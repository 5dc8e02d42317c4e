"""Braid-group representations from braid-equation solutions on C^2 (x) C^2"""
__version__ = '0.1.0'
