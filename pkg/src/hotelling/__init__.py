"""Nash equilibria of the Hotelling game with random tolerance intervals."""
