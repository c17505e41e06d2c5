# Unit tests package



