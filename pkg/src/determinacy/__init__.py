"""Infinite determinacy with Denjoy-Carleman regularity: algebra, sequences and separation estimates."""

__version__ = "0.1.0"
