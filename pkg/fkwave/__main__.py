from fkwave.main import main

main()
