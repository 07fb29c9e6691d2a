"""Package for conjugacy-pit."""
