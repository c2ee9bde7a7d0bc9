"""Lubin-Tate formal groups, Coleman's trace operator and eigenspace maps."""
