# Integration tests package



