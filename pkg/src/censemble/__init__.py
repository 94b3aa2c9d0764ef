"""Compression ensembles: vectors of compressed-size ratios of transformed
images plus statistical features, and the analyses built on them."""

__version__ = "0.1.0"
