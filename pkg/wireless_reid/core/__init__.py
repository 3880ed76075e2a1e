"""Core domain types shared across wireless_reid."""
