"""LangGraph orchestration utilities."""
