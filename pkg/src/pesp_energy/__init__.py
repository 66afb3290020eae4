"""Periodic timetabling that trades passenger travel time against brake-traction overlap."""
