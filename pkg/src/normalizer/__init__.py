"""Мова виразів: граматика lark та рендеринг (текст, LaTeX, JSON)."""
