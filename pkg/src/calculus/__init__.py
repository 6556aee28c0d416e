"""Алгебра коваріантних похідних."""
