"""Аналіз замикання: градуювання, слабка редукція, вердикти та звіти."""
