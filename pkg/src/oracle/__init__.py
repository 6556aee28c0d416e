"""Чисельний оракул: карти, оцінка виразів, скінченно-різницеві похідні функціоналів."""
