"""Integration tests for fpm-half."""
