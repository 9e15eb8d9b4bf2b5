"""Homogeneous mu-way Latin trades: construction, verification, planning and search."""
