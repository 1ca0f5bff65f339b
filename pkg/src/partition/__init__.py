"""l-partition systems: validation, counting, naming and sampling."""
