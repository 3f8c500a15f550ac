"""Built-in naming configurations, shipped as JSON documents."""
