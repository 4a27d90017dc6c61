"""
Command blueprints

Each module registers its click commands on `bp.cli`; create_app merges
them into the application's command group.
"""
