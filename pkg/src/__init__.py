"""Multi-state Markov engine for lung-cancer critical illness insurance."""
