"""Пакет тестів."""
