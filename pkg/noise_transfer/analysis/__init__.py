"""Circuit analyses, Monte Carlo sampling and the convolution oracle."""
