"""
System Service
===============
Resource usage of the running process using psutil.
"""

import os
import platform
from typing import Dict

import psutil


class SystemService:
    """
    Service for process resource reporting during long runs.
    """

    @staticmethod
    def get_process_info() -> Dict:
        """
        Get memory and CPU usage of this process.

        Returns:
            dict: RSS, VMS, CPU times and thread count
        """
        try:
            proc = psutil.Process(os.getpid())
            mem = proc.memory_info()
            cpu = proc.cpu_times()
            return {
                'pid': proc.pid,
                'rss': mem.rss,
                'vms': mem.vms,
                'rss_mb': round(mem.rss / (1024**2), 1),
                'cpu_user_s': round(cpu.user, 2),
                'cpu_system_s': round(cpu.system, 2),
                'threads': proc.num_threads(),
            }
        except (psutil.NoSuchProcess, psutil.AccessDenied) as e:
            return {'error': str(e), 'rss_mb': 0.0}

    @staticmethod
    def get_system_info() -> Dict:
        return {
            'hostname': platform.node(),
            'os': platform.system(),
            'architecture': platform.machine(),
            'python_version': platform.python_version(),
            'cores_logical': psutil.cpu_count(logical=True),
        }


# Singleton instance
system_service = SystemService()
