"""Pipeline services for wireless_reid."""
