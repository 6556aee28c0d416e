"""В'язі ADM, дужка Пуассона та бібліотека специфікацій."""
