"""Тензорна алгебра: реєстр символів, канонізація, метрика, підстановки."""
