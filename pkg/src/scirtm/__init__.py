"""
Phase dynamics of the race-track microtron.
"""
