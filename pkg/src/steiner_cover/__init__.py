"""Steiner networks, branched coverings and calibrations."""
