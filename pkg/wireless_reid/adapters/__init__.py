"""File and storage integrations for wireless_reid."""
