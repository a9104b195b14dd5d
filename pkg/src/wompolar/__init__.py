"""Write-once-memory rewriting codes by source polarization."""
