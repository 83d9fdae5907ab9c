"""Alignment oracle for substring-pair LCS / edit-distance queries."""
