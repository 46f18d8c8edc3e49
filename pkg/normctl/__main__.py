"""python -m normctl"""

from normctl.main import main

main()
