"""Unit tests for fpm-half."""
