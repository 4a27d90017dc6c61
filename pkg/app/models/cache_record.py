from app import db
from datetime import datetime, timezone


class CacheRecord(db.Model):
    """One cached result, keyed by (operation, canonical params, artifact version)"""
    __tablename__ = 'cache_records'

    id = db.Column(db.Integer, primary_key=True)
    operation = db.Column(db.String(64), nullable=False, index=True)
    params = db.Column(db.Text, nullable=False)
    version = db.Column(db.String(32), nullable=False)

    # Serialized result and its sha256 hex digest
    payload = db.Column(db.Text, nullable=False)
    checksum = db.Column(db.String(64), nullable=False)

    created_at = db.Column(db.DateTime(timezone=True), default=lambda: datetime.now(timezone.utc))

    __table_args__ = (
        db.UniqueConstraint('operation', 'params', 'version', name='unique_cache_key'),
    )

    def to_dict(self):
        return {
            'id': self.id,
            'operation': self.operation,
            'params': self.params,
            'version': self.version,
            'checksum': self.checksum,
            'size': len(self.payload) if self.payload else 0,
            'created_at': self.created_at.isoformat() if self.created_at else None
        }

    def __repr__(self):
        return f'<CacheRecord {self.operation} {self.params}>'
