"""Colour-discrepancy of tight Hamilton cycles in Dirac-type hypergraphs."""
