# Tests package for Grok-Beast Trading Bot



