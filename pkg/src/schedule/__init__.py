"""Level schedules and their convergence analysis."""
