"""fpm-half test suite."""
