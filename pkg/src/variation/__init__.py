"""Варіаційне числення: спеціальні тензори, δ за g та π, функціональні похідні."""
